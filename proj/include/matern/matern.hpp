#pragma once

#include "matern/analysis.hpp"
#include "matern/conditional_joint.hpp"
#include "matern/covariance.hpp"
#include "matern/error.hpp"
#include "matern/kernel.hpp"
#include "matern/special_functions.hpp"
