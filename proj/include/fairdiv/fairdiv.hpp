#pragma once

#include "fairdiv/error.hpp"
#include "fairdiv/rational.hpp"
#include "fairdiv/model.hpp"
#include "fairdiv/indices.hpp"
#include "fairdiv/hopcroft_karp.hpp"
#include "fairdiv/exact.hpp"
#include "fairdiv/online.hpp"
#include "fairdiv/experiment.hpp"
#include "fairdiv/io.hpp"
