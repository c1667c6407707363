#pragma once

// Umbrella header: pulls in the whole shape-set evaluation library.

#include "shapeval/assignment.hpp"
#include "shapeval/coco_io.hpp"
#include "shapeval/detection_criteria.hpp"
#include "shapeval/experiments.hpp"
#include "shapeval/geometry.hpp"
#include "shapeval/json_out.hpp"
#include "shapeval/mot_io.hpp"
#include "shapeval/random.hpp"
#include "shapeval/ranking.hpp"
#include "shapeval/report.hpp"
#include "shapeval/sanity.hpp"
#include "shapeval/set_metrics.hpp"
#include "shapeval/track_metrics.hpp"
#include "shapeval/version.hpp"
