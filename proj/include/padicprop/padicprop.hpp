#pragma once

#include "padicprop/characters.hpp"
#include "padicprop/error.hpp"
#include "padicprop/exact_complex.hpp"
#include "padicprop/mechanics.hpp"
#include "padicprop/oracle.hpp"
#include "padicprop/padic.hpp"
#include "padicprop/propagator.hpp"
#include "padicprop/random.hpp"
#include "padicprop/rational.hpp"
#include "padicprop/run_spec.hpp"
#include "padicprop/series.hpp"
#include "padicprop/verify.hpp"
