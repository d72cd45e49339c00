#ifndef GRAMLAB_DEPTH_H_
#define GRAMLAB_DEPTH_H_

#include <cstddef>
#include <vector>

#include "gramlab/tree.h"

namespace gramlab {

// Left-corner memory depth.
//
// The root sits at depth 1 on side L. A left child inherits its parent's
// depth, plus one when the parent is itself a right child; a right child keeps
// the parent's depth. Only nodes dominating two or more terminals count
// toward a tree's depth: a lexical left corner completes immediately.

enum class Side { kLeft, kRight };

struct NodeDepth {
    int depth = 1;
    Side side = Side::kLeft;
    std::size_t begin = 0;  // span over the yield
    std::size_t end = 0;
    bool branching = false;  // dominates >= 2 terminals
};

// Depth of the left child of a node at (depth, side).
inline int left_child_depth(int depth, Side side) {
    return side == Side::kRight ? depth + 1 : depth;
}

// One entry per internal node (preterminals included, leaves excluded),
// in preorder. Throws Error on a non-binary tree.
std::vector<NodeDepth> annotate_depths(const Tree &tree);

// Maximum depth over branching nodes; 1 for a single preterminal.
int tree_depth(const Tree &tree);

// tree_depth(tree) <= bound. Throws Error when bound < 1.
bool check_bound(const Tree &tree, int bound);

}  // namespace gramlab

#endif  // GRAMLAB_DEPTH_H_
