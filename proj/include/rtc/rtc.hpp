#pragma once

#include "rtc/geometry.hpp"
#include "rtc/io.hpp"
#include "rtc/netmodel.hpp"
#include "rtc/queries.hpp"
#include "rtc/routing.hpp"
#include "rtc/scenario.hpp"
#include "rtc/scheduler.hpp"
#include "rtc/selection.hpp"
#include "rtc/sim.hpp"
