#ifndef RTREE_COVER_RTREE_COVER_HPP
#define RTREE_COVER_RTREE_COVER_HPP

#include "rtree_cover/covering_tree.hpp"
#include "rtree_cover/error.hpp"
#include "rtree_cover/graph_io.hpp"
#include "rtree_cover/loop_group.hpp"
#include "rtree_cover/metric_graph.hpp"
#include "rtree_cover/random_paths.hpp"
#include "rtree_cover/rational.hpp"
#include "rtree_cover/report.hpp"
#include "rtree_cover/rho_path.hpp"
#include "rtree_cover/tree_builder.hpp"
#include "rtree_cover/url_lift.hpp"

#endif // RTREE_COVER_RTREE_COVER_HPP
