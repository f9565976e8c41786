#!/usr/bin/env python3
"""Regenerate cases/case39_22.json, case39_24.json, case39_26.json.

Source data: the standard IEEE 39-bus (New England) test system — branch
impedances, loads, generator dispatch/voltage setpoints, and machine
constants on the 100 MVA base. The shipped cases are network reductions of
that system onto the buses that carry dynamic devices:

  1. build the full 39-bus admittance matrix (line charging folded into the
     terminal-bus shunts; transformer taps treated as 1.0),
  2. solve the base-case power flow,
  3. convert static loads at non-device buses to constant shunt admittance
     at their solved voltage,
  4. Kron-eliminate all non-device buses,
  5. decompose the reduced admittance matrix into equivalent branches and
     bus shunts. A handful of weak equivalent branches come out with a
     small negative series resistance (an ordinary Kron-reduction
     artifact); those resistances are clamped to zero.

Device placement (one consistent assignment; the reduced cases renumber
buses 0..n-1, generators first, with the original bus number recorded in
"source_bus"):
  SG   at original buses 30, 31, 33, 35, 37, 39   (31 = slack)
  QD   at original buses 32, 34, 36, 38 (replacing generators)
  CD   at load buses 3, 4, 7, 8, 15, 16, 25, 26
  QD   at load buses 20, 23, 24, 27
  case39_24 adds CD@18, QD@21; case39_26 further adds CD@28, QD@29.

Droop time constants map to the study table in device file order (QD1..QD8,
CD1..CD8); the four augmented devices reuse the table cyclically. Inertia
constants H are converted to M = 2H / (2*pi*60). Damping D, which the
standard dataset leaves unspecified, is set to 0.05 pu uniformly.

The embedded injection profile (loads[] = gen dispatch minus bus loads at
the device buses) is 0.85x the standard values: the studies sweep the scale
factor up to 2.0, and the reduced network's flat-start Newton loadability
nose sits just below 2.0x the unscaled standard profile.

Usage: python3 scripts/make_case39.py   (writes into cases/ next to scripts/)
"""
import json
import os

import numpy as np

# (from, to, r, x, b_charging) per unit on 100 MVA
BRANCHES = [
    (1, 2, 0.0035, 0.0411, 0.6987), (1, 39, 0.0010, 0.0250, 0.7500),
    (2, 3, 0.0013, 0.0151, 0.2572), (2, 25, 0.0070, 0.0086, 0.1460),
    (2, 30, 0.0000, 0.0181, 0.0000), (3, 4, 0.0013, 0.0213, 0.2214),
    (3, 18, 0.0011, 0.0133, 0.2138), (4, 5, 0.0008, 0.0128, 0.1342),
    (4, 14, 0.0008, 0.0129, 0.1382), (5, 6, 0.0002, 0.0026, 0.0434),
    (5, 8, 0.0008, 0.0112, 0.1476), (6, 7, 0.0006, 0.0092, 0.1130),
    (6, 11, 0.0007, 0.0082, 0.1389), (6, 31, 0.0000, 0.0250, 0.0000),
    (7, 8, 0.0004, 0.0046, 0.0780), (8, 9, 0.0023, 0.0363, 0.3804),
    (9, 39, 0.0010, 0.0250, 1.2000), (10, 11, 0.0004, 0.0043, 0.0729),
    (10, 13, 0.0004, 0.0043, 0.0729), (10, 32, 0.0000, 0.0200, 0.0000),
    (12, 11, 0.0016, 0.0435, 0.0000), (12, 13, 0.0016, 0.0435, 0.0000),
    (13, 14, 0.0009, 0.0101, 0.1723), (14, 15, 0.0018, 0.0217, 0.3660),
    (15, 16, 0.0009, 0.0094, 0.1710), (16, 17, 0.0007, 0.0089, 0.1342),
    (16, 19, 0.0016, 0.0195, 0.3040), (16, 21, 0.0008, 0.0135, 0.2548),
    (16, 24, 0.0003, 0.0059, 0.0680), (17, 18, 0.0007, 0.0082, 0.1319),
    (17, 27, 0.0013, 0.0173, 0.3216), (19, 20, 0.0007, 0.0138, 0.0000),
    (19, 33, 0.0007, 0.0142, 0.0000), (20, 34, 0.0009, 0.0180, 0.0000),
    (21, 22, 0.0008, 0.0140, 0.2565), (22, 23, 0.0006, 0.0096, 0.1846),
    (22, 35, 0.0000, 0.0143, 0.0000), (23, 24, 0.0022, 0.0350, 0.3610),
    (23, 36, 0.0005, 0.0272, 0.0000), (25, 26, 0.0032, 0.0323, 0.5310),
    (25, 37, 0.0006, 0.0232, 0.0000), (26, 27, 0.0014, 0.0147, 0.2396),
    (26, 28, 0.0043, 0.0474, 0.7802), (26, 29, 0.0057, 0.0625, 1.0290),
    (28, 29, 0.0014, 0.0151, 0.2490), (29, 38, 0.0008, 0.0156, 0.0000),
]
LOADS = {
    3: (3.22, 0.024), 4: (5.00, 1.84), 7: (2.338, 0.84), 8: (5.22, 1.76),
    12: (0.085, 0.88), 15: (3.20, 1.53), 16: (3.294, 0.323), 18: (1.58, 0.30),
    20: (6.80, 1.03), 21: (2.74, 1.15), 23: (2.475, 0.846), 24: (3.086, -0.922),
    25: (2.24, 0.472), 26: (1.39, 0.17), 27: (2.81, 0.755), 28: (2.06, 0.276),
    29: (2.835, 0.269), 31: (0.092, 0.046), 39: (11.04, 2.50),
}
GENS = {  # bus -> (P dispatch pu, V setpoint); 31 is the slack
    30: (2.50, 1.0499), 31: (None, 0.9820), 32: (6.50, 0.9841), 33: (6.32, 0.9972),
    34: (5.08, 1.0123), 35: (6.50, 1.0494), 36: (5.60, 1.0636), 37: (5.40, 1.0275),
    38: (8.30, 1.0265), 39: (10.00, 1.0300),
}
MACH = {  # bus -> (H, xd, xd', Td0')
    30: (42.0, 0.100, 0.0310, 10.2), 31: (30.3, 0.295, 0.0697, 6.56),
    32: (35.8, 0.2495, 0.0531, 5.70), 33: (28.6, 0.262, 0.0436, 5.69),
    34: (26.0, 0.670, 0.1320, 5.40), 35: (34.8, 0.254, 0.0500, 7.30),
    36: (26.4, 0.295, 0.0490, 5.66), 37: (24.3, 0.290, 0.0570, 6.70),
    38: (34.5, 0.2106, 0.0570, 4.79), 39: (500.0, 0.020, 0.0060, 7.00),
}
OMEGA_S = 2.0 * np.pi * 60.0
DAMPING = 0.05

SG_BUS = [30, 31, 33, 35, 37, 39]
QD_GEN = [32, 34, 36, 38]
CD_LOAD = [3, 4, 7, 8, 15, 16, 25, 26]
QD_LOAD = [20, 23, 24, 27]
QD_TAU = [(0.3, 7.0), (0.2, 7.5), (0.13, 8.0), (0.26, 8.2),
          (0.4, 8.5), (0.2, 6.5), (0.25, 9.2), (0.35, 9.6)]
CD_TAU = [(0.3, 8.1), (0.25, 9.0), (0.15, 9.5), (0.28, 9.3),
          (0.34, 10.0), (0.22, 9.5), (0.4, 7.0), (0.5, 6.5)]


def full_admittance():
    y = np.zeros((40, 40), complex)  # 1-indexed
    for f, t, r, x, b in BRANCHES:
        yl = 1.0 / (r + 1j * x)
        y[f, f] += yl + 0.5j * b
        y[t, t] += yl + 0.5j * b
        y[f, t] -= yl
        y[t, f] -= yl
    return y[1:, 1:]


def solve_base_power_flow():
    """Flat-start Newton on the full 39-bus system (base profile, s=1)."""
    n = 39
    Y = full_admittance()
    G, B = Y.real, Y.imag
    roles = np.full(n, 2)  # PQ
    p_set = np.zeros(n)
    q_set = np.zeros(n)
    v_set = np.ones(n)
    for b, (p, q) in LOADS.items():
        p_set[b - 1] -= p
        q_set[b - 1] -= q
    for b, (p, v) in GENS.items():
        roles[b - 1] = 1  # PV
        v_set[b - 1] = v
        if p is not None:
            p_set[b - 1] += p
    roles[31 - 1] = 0  # slack

    th = np.zeros(n)
    V = v_set.copy()
    V[roles == 2] = 1.0
    ang = np.where(roles != 0)[0]
    vik = np.where(roles == 2)[0]
    for _ in range(60):
        U = V * np.exp(1j * th)
        S = U * np.conj((G + 1j * B) @ U)
        P, Q = S.real, S.imag
        mis = np.concatenate([P[ang] - p_set[ang], Q[vik] - q_set[vik]])
        if np.max(np.abs(mis)) < 1e-10:
            return th, V
        dP_dth = np.zeros((n, n)); dP_dV = np.zeros((n, n))
        dQ_dth = np.zeros((n, n)); dQ_dV = np.zeros((n, n))
        for i in range(n):
            dP_dth[i, i] = -Q[i] - B[i, i] * V[i] ** 2
            dP_dV[i, i] = P[i] / V[i] + G[i, i] * V[i]
            dQ_dth[i, i] = P[i] - G[i, i] * V[i] ** 2
            dQ_dV[i, i] = Q[i] / V[i] - B[i, i] * V[i]
            for j in range(n):
                if i == j:
                    continue
                tij = th[i] - th[j]
                c, s = np.cos(tij), np.sin(tij)
                dP_dth[i, j] = -V[i] * V[j] * (B[i, j] * c - G[i, j] * s)
                dP_dV[i, j] = V[i] * (B[i, j] * s + G[i, j] * c)
                dQ_dth[i, j] = -V[i] * V[j] * (B[i, j] * s + G[i, j] * c)
                dQ_dV[i, j] = -V[i] * (B[i, j] * c - G[i, j] * s)
        J = np.block([[dP_dth[np.ix_(ang, ang)], dP_dV[np.ix_(ang, vik)]],
                      [dQ_dth[np.ix_(vik, ang)], dQ_dV[np.ix_(vik, vik)]]])
        dx = np.linalg.solve(J, -mis)
        th[ang] += dx[:len(ang)]
        V[vik] += dx[len(ang):]
    raise RuntimeError("base power flow did not converge")


def reduce_to(device_buses, v_solved):
    """Kron-reduce onto device_buses; returns (lines, shunts) 0-indexed
    relative to the ordering of device_buses."""
    Y = full_admittance()
    for b, (p, q) in LOADS.items():
        if b in device_buses:
            continue
        v = v_solved[b - 1]
        Y[b - 1, b - 1] += (p - 1j * q) / v ** 2
    keep = [b - 1 for b in device_buses]
    elim = [i for i in range(39) if i not in keep]
    ykk = Y[np.ix_(keep, keep)]
    yke = Y[np.ix_(keep, elim)]
    yee = Y[np.ix_(elim, elim)]
    yek = Y[np.ix_(elim, keep)]
    yr = ykk - yke @ np.linalg.solve(yee, yek)

    n = len(keep)
    lines = []
    for i in range(n):
        for j in range(i + 1, n):
            yij = -yr[i, j]
            if abs(yij) < 1e-7:
                continue
            z = 1.0 / yij
            lines.append((i, j, max(z.real, 0.0), z.imag))  # clamp Kron artifacts
    shunts = np.diag(yr).astype(complex).copy()
    for i, j, r, x in lines:
        yl = 1.0 / (r + 1j * x)
        shunts[i] -= yl
        shunts[j] -= yl
    return lines, shunts


def build_case(name, extra_cd=(), extra_qd=()):
    cd_load = CD_LOAD + list(extra_cd)
    qd_load = QD_LOAD + list(extra_qd)
    gen_buses = sorted(SG_BUS + QD_GEN)
    load_buses = sorted(cd_load + qd_load)
    device_buses = gen_buses + load_buses  # generators first

    th, V = solve_base_power_flow()
    lines, shunts = reduce_to(device_buses, V)

    buses = []
    for k, b in enumerate(device_buses):
        role = "PQ"
        v_set = 1.0
        if b in GENS:
            role = "Slack" if b == 31 else "PV"
            v_set = GENS[b][1]
        entry = {"id": k, "shunt_g": shunts[k].real, "shunt_b": shunts[k].imag,
                 "role": role, "source_bus": b}
        if role != "PQ":
            entry["v_set"] = v_set
        buses.append(entry)

    loads = []
    profile_factor = 0.85  # keep the s = 0.5..2.0 sweep inside deliverability
    for k, b in enumerate(device_buses):
        p = q = 0.0
        if b in LOADS:
            p -= LOADS[b][0]
            q -= LOADS[b][1]
        if b in GENS and GENS[b][0] is not None:
            p += GENS[b][0]
        if p != 0.0 or q != 0.0:
            loads.append({"bus": k, "p": p * profile_factor, "q": q * profile_factor})

    devices = []
    qd_i = cd_i = 0
    id_of = {b: k for k, b in enumerate(device_buses)}
    for b in gen_buses + load_buses:
        k = id_of[b]
        if b in SG_BUS:
            H, xd, xdp, td = MACH[b]
            devices.append({"bus": k, "kind": "SG",
                            "params": {"m": round(2.0 * H / OMEGA_S, 6), "d": DAMPING,
                                       "td_prime": td, "xd": xd, "xd_prime": xdp},
                            "sigma": None})
        elif b in QD_GEN or b in qd_load:
            t1, t2 = QD_TAU[qd_i % 8]
            qd_i += 1
            devices.append({"bus": k, "kind": "QD",
                            "params": {"tau1": t1, "tau2": t2}, "sigma": None})
        else:
            t1, t2 = CD_TAU[cd_i % 8]
            cd_i += 1
            devices.append({"bus": k, "kind": "CD",
                            "params": {"tau1": t1, "tau2": t2}, "sigma": None})

    case = {
        "_comment": ("Network reduction of the standard IEEE 39-bus test system onto "
                     "its dynamic-device buses (static loads converted to constant "
                     "admittance at the base-case voltages, then Kron-eliminated; "
                     "negative equivalent resistances clamped to zero). Bus field "
                     "'source_bus' records the original 39-bus numbering. "
                     "Regenerate with scripts/make_case39.py."),
        "base_mva": 100.0,
        "scale": 1.0,
        "buses": buses,
        "lines": [{"from": i, "to": j, "r": r, "x": x} for i, j, r, x in lines],
        "loads": loads,
        "devices": devices,
    }
    out = os.path.join(os.path.dirname(__file__), "..", "cases", name)
    with open(out, "w") as f:
        json.dump(case, f, indent=1)
        f.write("\n")
    dim = sum(3 if d["kind"] == "SG" else 2 for d in devices)
    print(f"{name}: {len(buses)} buses, {len(lines)} lines, "
          f"{len(devices)} devices, state dim {dim}")


if __name__ == "__main__":
    build_case("case39_22.json")
    build_case("case39_24.json", extra_cd=(18,), extra_qd=(21,))
    build_case("case39_26.json", extra_cd=(18, 28), extra_qd=(21, 29))
