use pyo3::prelude::*;

use pyqinsdel::pyqinsdel;

fn run(code: &str) {
    pyo3::append_to_inittab!(pyqinsdel);
    Python::attach(|py| {
        let code = std::ffi::CString::new(code).unwrap();
        if let Err(e) = py.run(&code, None, None) {
            e.print(py);
            panic!("python check failed");
        }
    });
}

#[test]
fn module_round_trip() {
    run(r#"
import pyqinsdel as q
assert q.edit_matrix([0, 1, 2], [1, 1, 2]) == [[0, 1, 2, 3], [1, 2, 3, 4], [2, 1, 2, 3], [3, 2, 3, 2]]
bot, top = q.extremal_paths([0, 1, 2], [1, 1, 2])
assert bot == [(3, 3), (2, 2), (1, 1), (0, 1), (0, 0)]
assert top == [(3, 3), (2, 2), (2, 1), (1, 0), (0, 0)]
assert q.candidates([0, 1, 2], [1, 1, 2]) == ([1], [2])
assert q.oracle_j([0, 1, 2], [1, 1, 2]) == [1, 2]
assert q.delete([0, 1, 2, 0], [2, 3]) == [0, 0]
assert q.monotone_periodic(5, 2) == [0, 1, 2, 0, 1]

code = q.Code()
mu = code.random_message(3)
cw = code.encode(mu)
assert cw.dims == [6] * 5
rx = code.channel(cw, 2, 5, "basis:5")
msg, report = code.decode(rx, seed=1)
assert msg.fidelity(mu) > 1 - 1e-9
assert report["branch"] in ("unitary-path", "deletion-path")
branches = code.decode_branches(rx)
assert abs(sum(p for p, _, _ in branches) - 1) < 1e-9
assert all(s.fidelity(mu) > 1 - 1e-9 for _, s, _ in branches)
assert q.State.from_json(rx.to_json()).fidelity(cw.components()[0][1]) >= 0
try:
    q.Code(t=1)
    raise AssertionError("t=1 accepted")
except ValueError:
    pass
"#);
}
