#pragma once

#include "alm/barrier.hpp"
#include "alm/closed_form.hpp"
#include "alm/dp.hpp"
#include "alm/errors.hpp"
#include "alm/experiment.hpp"
#include "alm/io.hpp"
#include "alm/linear_program.hpp"
#include "alm/loss.hpp"
#include "alm/oracle.hpp"
#include "alm/problem.hpp"
#include "alm/quadrature.hpp"
#include "alm/scenario_tree.hpp"
#include "alm/stopping_time.hpp"
