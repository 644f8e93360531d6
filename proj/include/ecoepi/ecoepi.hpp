#pragma once

#include "ecoepi/errors.hpp"
#include "ecoepi/coefficient.hpp"
#include "ecoepi/response.hpp"
#include "ecoepi/vital.hpp"
#include "ecoepi/model.hpp"
#include "ecoepi/validation.hpp"
#include "ecoepi/integrator.hpp"
#include "ecoepi/attractor.hpp"
#include "ecoepi/subsystems.hpp"
#include "ecoepi/quadrature.hpp"
#include "ecoepi/thresholds.hpp"
#include "ecoepi/model_io.hpp"
#include "ecoepi/experiments.hpp"
#include "ecoepi/svg.hpp"
