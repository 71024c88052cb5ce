#pragma once

#include "ddp/errors.hpp"
#include "ddp/linalg.hpp"
#include "ddp/subspace.hpp"
#include "ddp/random.hpp"
#include "ddp/placement.hpp"
#include "ddp/geometry.hpp"
#include "ddp/plant.hpp"
#include "ddp/lattice.hpp"
#include "ddp/verify.hpp"
#include "ddp/generator.hpp"
#include "ddp/synthesis.hpp"
