#ifndef BUBBLE_BUBBLE_HPP_
#define BUBBLE_BUBBLE_HPP_

#include "bubble/calibrate.hpp"
#include "bubble/density.hpp"
#include "bubble/error.hpp"
#include "bubble/fpt.hpp"
#include "bubble/io.hpp"
#include "bubble/kummer.hpp"
#include "bubble/laplace.hpp"
#include "bubble/model.hpp"
#include "bubble/sde.hpp"

#endif  // BUBBLE_BUBBLE_HPP_
