#pragma once

#include "nlkit/bounds.hpp"
#include "nlkit/cli.hpp"
#include "nlkit/field.hpp"
#include "nlkit/io.hpp"
#include "nlkit/moduli.hpp"
#include "nlkit/quadratic.hpp"
#include "nlkit/truth_table.hpp"
#include "nlkit/verify.hpp"
