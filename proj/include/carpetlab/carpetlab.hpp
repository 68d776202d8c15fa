#ifndef CARPETLAB_CARPETLAB_HPP
#define CARPETLAB_CARPETLAB_HPP

#include "box_basis.hpp"
#include "carpet.hpp"
#include "common.hpp"
#include "decomposition.hpp"
#include "quadrature.hpp"
#include "resum.hpp"
#include "revival.hpp"
#include "wavepacket.hpp"
#include "wigner.hpp"
#include "worldline.hpp"

#endif
