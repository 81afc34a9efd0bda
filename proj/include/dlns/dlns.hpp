#pragma once

#include "dlns/baselines.hpp"
#include "dlns/dbr.hpp"
#include "dlns/destroy.hpp"
#include "dlns/dpop_dbr.hpp"
#include "dlns/engine.hpp"
#include "dlns/errors.hpp"
#include "dlns/generators.hpp"
#include "dlns/graph.hpp"
#include "dlns/instance.hpp"
#include "dlns/io.hpp"
#include "dlns/sim.hpp"
#include "dlns/tdbr.hpp"
#include "dlns/trace.hpp"
#include "dlns/utility.hpp"
