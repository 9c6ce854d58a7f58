#pragma once

#include "pid/analysis.hpp"
#include "pid/document.hpp"
#include "pid/dot.hpp"
#include "pid/dsep.hpp"
#include "pid/model.hpp"
#include "pid/node_set.hpp"
#include "pid/oracle.hpp"
#include "pid/ordering.hpp"
