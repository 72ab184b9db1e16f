"""Smoke test for the ltdesk_py extension.

Build and install first, for example
    pip install maturin && maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/ltdesk_py-*.whl
"""

import json

import ltdesk_py


def main():
    names = [name for name, _ in ltdesk_py.list_experiments()]
    assert len(names) == 20, names
    assert "kernels" in names

    report = json.loads(ltdesk_py.run_experiment("j-homomorphism", seed=7))
    assert report["schema_version"] == ltdesk_py.SCHEMA_VERSION
    assert report["pass"] is True
    again = ltdesk_py.run_experiment("j-homomorphism", seed=7)
    assert json.loads(again) == report

    custom = json.loads(ltdesk_py.run_experiment("vs-stability", config='{"p": 3, "h": 2}'))
    assert custom["config"]["p"] == 3

    csv = ltdesk_py.emit(json.dumps(report), "csv")
    assert csv.startswith("experiment,check_id,anchor,pass")

    try:
        ltdesk_py.run_experiment("action-law", config='{"p": 4}')
    except ValueError:
        pass
    else:
        raise AssertionError("a composite p must be rejected")

    print("smoke test passed")


if __name__ == "__main__":
    main()
