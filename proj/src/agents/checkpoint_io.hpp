#pragma once

#include <iomanip>
#include <istream>
#include <ostream>

#include "volfml/agents/replay.hpp"
#include "volfml/nn/optim.hpp"

// text serialization helpers shared by the agent checkpoints; doubles are
// written with 17 significant digits for exact round-trips
namespace volfml::agents::ckpt {

inline void write_vec(std::ostream& os, const nn::ParamVector& v) {
    os << v.size();
    os << std::setprecision(17);
    for (double x : v) os << " " << x;
    os << "\n";
}

inline nn::ParamVector read_vec(std::istream& is) {
    size_t n;
    is >> n;
    nn::ParamVector v(n);
    for (double& x : v) is >> x;
    return v;
}

inline void write_adam(std::ostream& os, const nn::AdamState& st) {
    os << st.step << "\n";
    write_vec(os, st.m);
    write_vec(os, st.v);
}

inline nn::AdamState read_adam(std::istream& is) {
    nn::AdamState st;
    is >> st.step;
    st.m = read_vec(is);
    st.v = read_vec(is);
    return st;
}

inline void write_transition(std::ostream& os, const Transition& t) {
    write_vec(os, t.state);
    write_vec(os, t.cont);
    os << t.disc << " " << std::setprecision(17) << t.reward << " " << (t.terminal ? 1 : 0)
       << "\n";
    write_vec(os, t.next_state);
}

inline Transition read_transition(std::istream& is) {
    Transition t;
    t.state = read_vec(is);
    t.cont = read_vec(is);
    int term;
    is >> t.disc >> t.reward >> term;
    t.terminal = term != 0;
    t.next_state = read_vec(is);
    return t;
}

inline void write_buffer(std::ostream& os, const ReplayBuffer& buf) {
    os << buf.size() << "\n";
    for (size_t i = 0; i < buf.size(); ++i) write_transition(os, buf.at(i));
}

inline void read_buffer(std::istream& is, ReplayBuffer& buf) {
    size_t n;
    is >> n;
    for (size_t i = 0; i < n; ++i) buf.push(read_transition(is));
}

}  // namespace volfml::agents::ckpt
