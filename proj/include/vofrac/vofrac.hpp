#pragma once

#include "caputo.hpp"
#include "esa_quadrature.hpp"
#include "gamma.hpp"
#include "grid.hpp"
#include "order_profile.hpp"
#include "problem.hpp"
#include "reference_cache.hpp"
#include "schemes.hpp"
#include "study.hpp"
#include "tridiagonal.hpp"
