#pragma once

#include "lqs/error.hpp"
#include "lqs/maslov.hpp"
#include "lqs/matrix_analysis.hpp"
#include "lqs/matrix_io.hpp"
#include "lqs/quasistates.hpp"
#include "lqs/random.hpp"
#include "lqs/report.hpp"
#include "lqs/symplectic.hpp"
#include "lqs/types.hpp"
#include "lqs/verify.hpp"
#include "lqs/williamson.hpp"
