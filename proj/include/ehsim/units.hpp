#pragma once

// Canonical units inside the simulator: mm, N, kV, ms (s where noted), N/mm^2.
// These helpers convert at the boundary from SI.

namespace ehsim::units {

constexpr double mm_from_m(double m) { return m * 1e3; }
constexpr double m_from_mm(double mm) { return mm * 1e-3; }
constexpr double mm3_from_ml(double ml) { return ml * 1e3; }
constexpr double kv_from_v(double v) { return v * 1e-3; }
constexpr double v_from_kv(double kv) { return kv * 1e3; }
constexpr double ms_from_s(double s) { return s * 1e3; }
constexpr double s_from_ms(double ms) { return ms * 1e-3; }
// 1 N/mm^2 = 1 MPa
constexpr double n_per_mm2_from_pa(double pa) { return pa * 1e-6; }
constexpr double pa_from_n_per_mm2(double p) { return p * 1e6; }

// K in N/mm^2/kV^2 from (1/2)·εr·ε0/d^2 expressed in SI (Pa/V^2).
constexpr double k_from_si(double pa_per_v2) { return n_per_mm2_from_pa(pa_per_v2) * 1e6; }

}  // namespace ehsim::units
