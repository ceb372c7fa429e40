#pragma once

#include "olivier/analysis.hpp"
#include "olivier/attacks.hpp"
#include "olivier/bitmatrix.hpp"
#include "olivier/bits.hpp"
#include "olivier/hash.hpp"
#include "olivier/keygen.hpp"
#include "olivier/protocol.hpp"
#include "olivier/quadform.hpp"
#include "olivier/rng.hpp"
#include "olivier/serialize.hpp"
