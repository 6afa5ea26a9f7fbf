#pragma once

// Umbrella header.

#include "bigint.hpp"
#include "collatz.hpp"
#include "dynamics.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "formula.hpp"
#include "homomorphism.hpp"
#include "normal_form.hpp"
#include "parser.hpp"
#include "random_formula.hpp"
#include "report.hpp"
#include "ring.hpp"
#include "semantics.hpp"
