#ifndef SLIM_SLIM_HPP
#define SLIM_SLIM_HPP

#include "slim/checkpoint.hpp"
#include "slim/error.hpp"
#include "slim/eval.hpp"
#include "slim/generate.hpp"
#include "slim/graph.hpp"
#include "slim/init.hpp"
#include "slim/io.hpp"
#include "slim/model.hpp"
#include "slim/optim.hpp"
#include "slim/rng.hpp"
#include "slim/skellam.hpp"
#include "slim/viz.hpp"

#endif  // SLIM_SLIM_HPP
