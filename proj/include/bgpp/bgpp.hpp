#pragma once

#include "bgpp/analytic_solutions.hpp"
#include "bgpp/eguchi_hanson.hpp"
#include "bgpp/errors.hpp"
#include "bgpp/full_flow.hpp"
#include "bgpp/integrator.hpp"
#include "bgpp/metric.hpp"
#include "bgpp/reduced_flow.hpp"
#include "bgpp/special_functions.hpp"
#include "bgpp/verify.hpp"
