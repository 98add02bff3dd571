#pragma once

#include "baselines.hpp"
#include "bench.hpp"
#include "bitio.hpp"
#include "bytes.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "dlms.hpp"
#include "error.hpp"
#include "pattern.hpp"
#include "persist.hpp"
#include "stream.hpp"
#include "synthgen.hpp"
#include "transform.hpp"
