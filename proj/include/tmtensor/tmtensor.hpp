#pragma once

#include "tmtensor/encoding.hpp"
#include "tmtensor/error.hpp"
#include "tmtensor/harness.hpp"
#include "tmtensor/machine.hpp"
#include "tmtensor/products.hpp"
#include "tmtensor/random.hpp"
#include "tmtensor/scalar.hpp"
#include "tmtensor/tensor.hpp"
