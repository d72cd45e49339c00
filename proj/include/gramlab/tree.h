#ifndef GRAMLAB_TREE_H_
#define GRAMLAB_TREE_H_

#include <cstddef>
#include <string>
#include <vector>

namespace gramlab {

// Labeled ordered tree. Leaves carry the surface token as their label;
// internal nodes carry a category. Gold trees may be n-ary; induced trees are
// strictly binary over preterminals.
struct Tree {
    std::string label;
    std::vector<Tree> children;

    Tree() = default;
    explicit Tree(std::string l) : label(std::move(l)) {}
    Tree(std::string l, std::vector<Tree> kids)
        : label(std::move(l)), children(std::move(kids)) {}

    bool is_leaf() const { return children.empty(); }
    bool is_preterminal() const {
        return children.size() == 1 && children.front().is_leaf();
    }

    friend bool operator==(const Tree &, const Tree &) = default;
};

// Convenience constructor for a preterminal `(label token)`.
Tree preterminal(std::string label, std::string token);

// Left-to-right leaf tokens.
std::vector<std::string> yield(const Tree &tree);
std::size_t yield_length(const Tree &tree);

std::size_t count_nodes(const Tree &tree);

// True iff every internal node has two internal children or is a preterminal.
// A bare leaf is not a binary tree.
bool is_binary(const Tree &tree);

// Throws Error naming `what` if !is_binary(tree).
void require_binary(const Tree &tree, const char *what);

}  // namespace gramlab

#endif  // GRAMLAB_TREE_H_
