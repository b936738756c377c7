#pragma once

// Umbrella header for the TAB-DRW tabular watermarking library.

#include "tabdrw/attacks.hpp"
#include "tabdrw/detect.hpp"
#include "tabdrw/dft.hpp"
#include "tabdrw/embed.hpp"
#include "tabdrw/fidelity.hpp"
#include "tabdrw/keying.hpp"
#include "tabdrw/prng.hpp"
#include "tabdrw/special.hpp"
#include "tabdrw/synthgen.hpp"
#include "tabdrw/table.hpp"
#include "tabdrw/theory.hpp"
#include "tabdrw/transform.hpp"
#include "tabdrw/yeo_johnson.hpp"
