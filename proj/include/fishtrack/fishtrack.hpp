#pragma once

#include "fishtrack/annotations.hpp"
#include "fishtrack/assignment.hpp"
#include "fishtrack/errors.hpp"
#include "fishtrack/geometry.hpp"
#include "fishtrack/kalman.hpp"
#include "fishtrack/locomotion.hpp"
#include "fishtrack/metrics_detection.hpp"
#include "fishtrack/metrics_tracking.hpp"
#include "fishtrack/mot_io.hpp"
#include "fishtrack/random.hpp"
#include "fishtrack/report.hpp"
#include "fishtrack/synth.hpp"
#include "fishtrack/tracker.hpp"
