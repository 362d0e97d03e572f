#pragma once

#include "gauge_certify/types.hpp"
#include "gauge_certify/bodies.hpp"
#include "gauge_certify/barrier.hpp"
#include "gauge_certify/subdiff.hpp"
#include "gauge_certify/expression.hpp"
#include "gauge_certify/registry.hpp"
#include "gauge_certify/variational.hpp"
#include "gauge_certify/certify.hpp"
#include "gauge_certify/config.hpp"
#include "gauge_certify/report_json.hpp"
