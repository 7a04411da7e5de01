#pragma once

#include "serinv/analysis.hpp"
#include "serinv/block.hpp"
#include "serinv/bta.hpp"
#include "serinv/error.hpp"
#include "serinv/kernels.hpp"
#include "serinv/ledger.hpp"
#include "serinv/oracle.hpp"
#include "serinv/parallel.hpp"
#include "serinv/sequential.hpp"
#include "serinv/transport.hpp"
