#pragma once

// Convenience umbrella: the whole library in one include.

#include "coefficient_vector.hpp"
#include "config.hpp"
#include "convergence.hpp"
#include "errors.hpp"
#include "hermitian.hpp"
#include "minimax.hpp"
#include "operator_model.hpp"
#include "ritz.hpp"
#include "rng.hpp"
#include "verify.hpp"
