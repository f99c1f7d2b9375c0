#ifndef RTREE_COVER_ERROR_HPP
#define RTREE_COVER_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rtree_cover {

/// Base of every exception thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed graph, point not on the graph, mismatched ambient graphs.
class graph_error : public error {
public:
    using error::error;
};

/// Ill-formed path, or a precondition on paths (range, endpoints) that fails.
class path_error : public error {
public:
    using error::error;
};

/// Syntax error in a path expression, rational literal or input file.
class parse_error : public error {
public:
    parse_error(const std::string& what, std::size_t position)
        : error(what + " (at position " + std::to_string(position) + ")"), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Group-theoretic precondition failures: identity where a nontrivial loop is
/// required, points in different fibres, a closure table that is missing a
/// translate, and so on.
class group_error : public error {
public:
    using error::error;
};

} // namespace rtree_cover

#endif // RTREE_COVER_ERROR_HPP
