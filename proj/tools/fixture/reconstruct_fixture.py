#!/usr/bin/env python3
"""Generate the bundled synthetic district fixture.

The official per-district results of the 2016 runoff are not redistributed
with this repository. This script builds a deterministic stand-in with the
same geometry: 117 districts, 11 contaminated, 3 dubious, and the published
aggregate constants reproduced exactly:

  * mail votes in the contaminated districts          77769
  * candidate-1 mail votes in contaminated districts  34479
  * national margin (candidate 2 minus candidate 1)   30863

District sizes and vote shares are drawn from a plausible range and the
candidate-1 mail votes follow v_m = k * v_b + N(0, sigma^2 * m). The model
constants are fixed a priori; nothing here is tuned toward a tail probability.

Usage: reconstruct_fixture.py > data/runoff2016_reconstructed.csv
"""

import sys

import numpy as np

SEED = 20160522
N_DISTRICTS = 117
N_RED = 11
N_DUBIOUS = 3

RED_MAIL_TOTAL = 77769
RED_MAIL_C1 = 34479
NATIONAL_MARGIN = 30863

K_TRUE = 0.147
SIGMA_TRUE = 7.0


def apportion(total, weights):
    """Largest-remainder apportionment of an integer total."""
    weights = np.asarray(weights, dtype=float)
    quotas = total * weights / weights.sum()
    base = np.floor(quotas).astype(np.int64)
    short = total - int(base.sum())
    order = np.argsort(-(quotas - base), kind="stable")
    base[order[:short]] += 1
    return base


def main():
    rng = np.random.default_rng(SEED)

    valid = np.round(rng.lognormal(mean=np.log(34000), sigma=0.45, size=N_DISTRICTS))
    valid = np.clip(valid, 6000, 140000).astype(np.int64)
    mail_share = rng.uniform(0.12, 0.22, size=N_DISTRICTS)
    ballot_c1_share = np.clip(rng.normal(0.53, 0.09, size=N_DISTRICTS), 0.22, 0.75)

    idx = rng.permutation(N_DISTRICTS)
    red = np.sort(idx[:N_RED])
    dubious = np.sort(idx[N_RED:N_RED + N_DUBIOUS])
    status = np.array(["green"] * N_DISTRICTS, dtype=object)
    status[red] = "red"
    status[dubious] = "dubious"

    mail = np.round(valid * mail_share).astype(np.int64)
    mail[red] = apportion(RED_MAIL_TOTAL, mail[red])
    valid[red] = np.round(mail[red] / mail_share[red]).astype(np.int64)
    ballot = valid - mail
    ballot_c1 = np.round(ballot * ballot_c1_share).astype(np.int64)
    # Contaminated districts get the candidate-1 ballot total under which the
    # published red mail result is the model's expectation (no manipulation).
    ballot_c1[red] = apportion(round(RED_MAIL_C1 / K_TRUE), ballot[red] * ballot_c1_share[red])
    assert np.all(ballot_c1[red] <= ballot[red])

    noise = rng.normal(0.0, SIGMA_TRUE * np.sqrt(mail.astype(float)))
    mail_c1 = np.round(K_TRUE * ballot_c1 + noise).astype(np.int64)
    mail_c1 = np.clip(mail_c1, 0, mail)

    # Match the published red-district candidate-1 mail total exactly.
    delta = RED_MAIL_C1 - int(mail_c1[red].sum())
    mail_c1[red] += apportion(abs(delta), mail[red]) * (1 if delta >= 0 else -1)
    assert int(mail_c1[red].sum()) == RED_MAIL_C1
    assert np.all(mail_c1 <= mail) and np.all(mail_c1 >= 0)

    # Match the national margin by shifting candidate-1 ballot votes in
    # green districts; parity fixed through one ballot total.
    def margin():
        total = int(ballot.sum() + mail.sum())
        c1 = int(ballot_c1.sum() + mail_c1.sum())
        return total - 2 * c1

    green = np.where(status == "green")[0]
    need = NATIONAL_MARGIN - margin()
    if need % 2:
        largest = green[np.argmax(ballot[green])]
        ballot[largest] += 1
        need -= 1
    shift = need // 2
    ballot_c1[green] -= apportion(abs(shift), ballot[green]) * (1 if shift >= 0 else -1)
    assert margin() == NATIONAL_MARGIN
    assert np.all(ballot_c1 <= ballot) and np.all(ballot_c1 >= 0)

    out = sys.stdout
    out.write("district_id,name,ballot_total,ballot_c1,mail_total,mail_c1,status\n")
    for n in range(N_DISTRICTS):
        out.write(
            f"D{n + 1:03d},Synthetic district {n + 1:03d},{ballot[n]},{ballot_c1[n]},"
            f"{mail[n]},{mail_c1[n]},{status[n]}\n"
        )


if __name__ == "__main__":
    main()
