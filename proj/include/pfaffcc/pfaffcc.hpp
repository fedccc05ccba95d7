#ifndef PFAFFCC_PFAFFCC_HPP
#define PFAFFCC_PFAFFCC_HPP

#include "configuration.hpp"
#include "errors.hpp"
#include "inverse.hpp"
#include "matrix.hpp"
#include "pfaffian.hpp"
#include "polynomial.hpp"
#include "positivity.hpp"
#include "scalar.hpp"

#endif
