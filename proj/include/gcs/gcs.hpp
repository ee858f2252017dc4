#pragma once

#include "gcs/jet.hpp"
#include "gcs/phase_space.hpp"
#include "gcs/coherent_state.hpp"
#include "gcs/residual.hpp"
#include "gcs/problem.hpp"
#include "gcs/quadrature.hpp"
#include "gcs/least_squares.hpp"
#include "gcs/fem.hpp"
#include "gcs/analysis.hpp"
#include "gcs/experiments.hpp"
