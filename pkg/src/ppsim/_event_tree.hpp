// Order-statistics red-black tree keyed by event time.
#ifndef PPSIM_EVENT_TREE_HPP
#define PPSIM_EVENT_TREE_HPP

#include <functional>
#include <utility>
#include <ext/pb_ds/assoc_container.hpp>
#include <ext/pb_ds/tree_policy.hpp>

typedef __gnu_pbds::tree<double, double, std::less<double>, __gnu_pbds::rb_tree_tag,
                         __gnu_pbds::tree_order_statistics_node_update>
    event_tree;

#endif
