// Umbrella header for the latsum library.

#pragma once

#include <latsum/battery.hpp>
#include <latsum/common.hpp>
#include <latsum/epstein.hpp>
#include <latsum/lattice.hpp>
#include <latsum/quadform.hpp>
#include <latsum/specfun.hpp>
#include <latsum/wigner.hpp>
