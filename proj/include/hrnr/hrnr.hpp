#pragma once

#include "hrnr/error.hpp"
#include "hrnr/fixtures.hpp"
#include "hrnr/geometry.hpp"
#include "hrnr/io.hpp"
#include "hrnr/linalg.hpp"
#include "hrnr/matrix.hpp"
#include "hrnr/matrix_poly.hpp"
#include "hrnr/parallel.hpp"
#include "hrnr/perron.hpp"
#include "hrnr/rank_range.hpp"
#include "hrnr/structure.hpp"
#include "hrnr/witness.hpp"
