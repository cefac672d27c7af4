#ifndef CDKP_CDKP_HPP
#define CDKP_CDKP_HPP

#include "cdkp/error.hpp"
#include "cdkp/expsum.hpp"
#include "cdkp/gauge.hpp"
#include "cdkp/grid.hpp"
#include "cdkp/linalg.hpp"
#include "cdkp/pdo.hpp"
#include "cdkp/solutions.hpp"
#include "cdkp/verify.hpp"
#include "cdkp/wronskian.hpp"

#endif  // CDKP_CDKP_HPP
