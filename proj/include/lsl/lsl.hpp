#pragma once

// everything
#include "lsl/grid.hpp"
#include "lsl/fft.hpp"
#include "lsl/field.hpp"
#include "lsl/operators.hpp"
#include "lsl/lebesgue.hpp"
#include "lsl/snapshot.hpp"
#include "lsl/littlewood_paley.hpp"
#include "lsl/time_grid.hpp"
#include "lsl/besov.hpp"
#include "lsl/bmo.hpp"
#include "lsl/egamma.hpp"
#include "lsl/norm_report.hpp"
#include "lsl/bounds.hpp"
#include "lsl/solver.hpp"
#include "lsl/datagen.hpp"
#include "lsl/fit.hpp"
#include "lsl/sweep.hpp"
#include "lsl/config.hpp"
#include "lsl/commands.hpp"
