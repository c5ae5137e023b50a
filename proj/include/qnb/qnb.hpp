// qnb/qnb.hpp - everything
#pragma once

#include "qnb/error.hpp"
#include "qnb/qmath.hpp"
#include "qnb/runcount.hpp"
#include "qnb/kernels.hpp"
#include "qnb/brute_force.hpp"
#include "qnb/closed_forms.hpp"
#include "qnb/dist.hpp"
#include "qnb/oracle.hpp"
#include "qnb/parallel.hpp"
#include "qnb/table_io.hpp"
#include "qnb/verify.hpp"
