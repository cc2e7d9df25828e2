#pragma once

// Umbrella header.

#include "qnet/basis.hpp"
#include "qnet/concurrence.hpp"
#include "qnet/dark_state.hpp"
#include "qnet/errors.hpp"
#include "qnet/graph.hpp"
#include "qnet/io.hpp"
#include "qnet/liouvillian.hpp"
#include "qnet/optimizer.hpp"
#include "qnet/polariton.hpp"
#include "qnet/states.hpp"
