#ifndef ARMCHAIR_ARMCHAIR_HPP
#define ARMCHAIR_ARMCHAIR_HPP

#include "armchair/error.hpp"
#include "armchair/hill.hpp"
#include "armchair/intervals.hpp"
#include "armchair/labels.hpp"
#include "armchair/localization.hpp"
#include "armchair/lyapunov.hpp"
#include "armchair/potential.hpp"
#include "armchair/rootfind.hpp"
#include "armchair/spectrum.hpp"

#endif  // ARMCHAIR_ARMCHAIR_HPP
