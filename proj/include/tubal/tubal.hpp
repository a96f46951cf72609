#pragma once

#include "tubal/bcirc.hpp"
#include "tubal/errors.hpp"
#include "tubal/factor.hpp"
#include "tubal/io.hpp"
#include "tubal/krylov.hpp"
#include "tubal/ops.hpp"
#include "tubal/parallel.hpp"
#include "tubal/problems.hpp"
#include "tubal/spectral.hpp"
#include "tubal/tensor.hpp"
