#pragma once

// Umbrella header for the vkin library: analytic kinematics of planar
// vehicle trajectories, C^2 trajectory fitting from sampled tracks, forward
// integration from control inputs, steering calibration and the track
// evaluation battery.

#include "vkin/config.hpp"
#include "vkin/core_model.hpp"
#include "vkin/csv.hpp"
#include "vkin/errors.hpp"
#include "vkin/evaluation.hpp"
#include "vkin/forward_model.hpp"
#include "vkin/geometry.hpp"
#include "vkin/metrics.hpp"
#include "vkin/spline.hpp"
#include "vkin/steering.hpp"
#include "vkin/sync.hpp"
#include "vkin/trajectory.hpp"
#include "vkin/vec2.hpp"
