#ifndef HARDY_HARDY_HPP
#define HARDY_HARDY_HPP

#include "coeff_fn.hpp"
#include "errors.hpp"
#include "inner.hpp"
#include "io.hpp"
#include "nearly.hpp"
#include "scenarios.hpp"
#include "subspace.hpp"
#include "symbol.hpp"

#endif // HARDY_HARDY_HPP
