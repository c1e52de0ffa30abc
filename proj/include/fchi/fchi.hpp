#pragma once

#include "fchi/chromatic.hpp"
#include "fchi/constructions.hpp"
#include "fchi/dense_pairs.hpp"
#include "fchi/engine/certificate.hpp"
#include "fchi/engine/levels.hpp"
#include "fchi/engine/params.hpp"
#include "fchi/engine/profile.hpp"
#include "fchi/engine/replay.hpp"
#include "fchi/engine/run.hpp"
#include "fchi/engine/steps.hpp"
#include "fchi/error.hpp"
#include "fchi/graph.hpp"
#include "fchi/io.hpp"
#include "fchi/random.hpp"
#include "fchi/rational.hpp"
#include "fchi/search.hpp"
#include "fchi/vertex_set.hpp"
