#pragma once

#include "fcwave/error.hpp"
#include "fcwave/hermite.hpp"
#include "fcwave/quadrature.hpp"
#include "fcwave/coupling1d.hpp"
#include "fcwave/coupling2d.hpp"
