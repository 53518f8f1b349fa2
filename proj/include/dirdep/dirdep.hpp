#pragma once

#include "dirdep/errors.hpp"
#include "dirdep/rng.hpp"
#include "dirdep/parallel.hpp"
#include "dirdep/geometry.hpp"
#include "dirdep/kernels.hpp"
#include "dirdep/statistics.hpp"
#include "dirdep/evaluators.hpp"
#include "dirdep/inference.hpp"
#include "dirdep/distributions.hpp"
#include "dirdep/samplers.hpp"
#include "dirdep/model_parser.hpp"
#include "dirdep/harness.hpp"
#include "dirdep/datasets.hpp"
#include "dirdep/csv.hpp"
#include "dirdep/io.hpp"
