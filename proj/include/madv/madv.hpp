#pragma once

#include "madv/adversary.hpp"
#include "madv/algorithms.hpp"
#include "madv/errors.hpp"
#include "madv/harness.hpp"
#include "madv/metric_core.hpp"
#include "madv/metric_io.hpp"
#include "madv/oracle.hpp"
#include "madv/replay.hpp"
#include "madv/sparse_recovery.hpp"
#include "madv/validate.hpp"
