#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "shadowing/dynamics.hpp"
#include "shadowing/rotation.hpp"

namespace shadowing {

// All CSV numbers go through %.17g so that identical inputs give
// byte-identical files; this is the byte-stable output surface.
inline std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,theta,x,y,alpha\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out += csv_number(traj.t[i]);
        out += ',';
        out += csv_number(traj.theta[i]);
        out += ',';
        out += csv_number(traj.position[i].x);
        out += ',';
        out += csv_number(traj.position[i].y);
        out += ',';
        out += csv_number(traj.alpha[i]);
        out += '\n';
    }
    return out;
}

inline std::string sweep_csv(const std::vector<SweepPoint>& points, int n_periods) {
    std::string out = "R,rho,error_bound,n_periods\n";
    for (const SweepPoint& p : points) {
        out += csv_number(p.R);
        out += ',';
        if (p.ok) {
            out += csv_number(p.estimate.value);
            out += ',';
            out += csv_number(p.estimate.error_bound);
        } else {
            out += "nan,nan";
        }
        out += ',';
        out += std::to_string(n_periods);
        out += '\n';
    }
    return out;
}

} // namespace shadowing
