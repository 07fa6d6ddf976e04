import math

import numpy as np
import pytest

from nvzero.model import (
    CONFIG_ENV_VAR,
    DjtParams,
    FieldNV,
    NvOrientation,
    ORIENTATIONS,
    PhysicalConstants,
    StrainNV,
    axis_from_label,
    lab_field_to_nv,
    lab_strain_to_nv,
    load_constants,
    normalize_alpha,
    orientation_by_label,
    oriented_djt,
    resolve_config_path,
    rotate_lab_to_nv,
    rotate_nv_to_lab,
)


def test_default_constants():
    c = PhysicalConstants()
    assert c.lambda_par == 4.3
    assert c.d_perp == 5.0
    assert c.d_par == 0.0
    assert c.d_ge == 6.0
    assert c.eps_es == 521.4
    assert c.eps_A1 == 192.0
    assert c.eps_A1_prime == -483.0
    assert c.eps_E == -600.0
    assert c.eps_E_prime == 360.0
    assert c.lambda_perp == 0.0


def test_boltzmann_is_fixed():
    assert PhysicalConstants.kB == pytest.approx(20.836619, abs=1e-6)
    assert "kB" not in PhysicalConstants().to_dict()
    with pytest.raises(ValueError):
        PhysicalConstants.from_dict({"kB": 1.0})


def test_constants_round_trip():
    c = PhysicalConstants(lambda_par=5.0, eps_E=-100.0)
    assert PhysicalConstants.from_dict(c.to_dict()) == c
    with pytest.raises(KeyError):
        PhysicalConstants.from_dict({"nonsense": 1.0})
    with pytest.raises(ValueError):
        PhysicalConstants(lambda_par=float("nan"))


def test_load_constants_toml(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text("lambda_par = 8.6\n")
    assert load_constants(str(p)).lambda_par == 8.6
    p2 = tmp_path / "c2.toml"
    p2.write_text("[constants]\nd_perp = 7.0\n")
    assert load_constants(str(p2)).d_perp == 7.0
    p3 = tmp_path / "c3.toml"
    p3.write_text("d_perp = 1.0\n[constants]\nd_perp = 2.0\n")
    with pytest.raises(ValueError):
        load_constants(str(p3))


def test_config_path_resolution(monkeypatch, tmp_path):
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)
    assert resolve_config_path(None) is None
    monkeypatch.setenv(CONFIG_ENV_VAR, str(tmp_path / "env.toml"))
    assert resolve_config_path(None) == str(tmp_path / "env.toml")
    # explicit argument wins over the environment
    assert resolve_config_path("explicit.toml") == "explicit.toml"


def test_normalize_alpha():
    assert normalize_alpha(181.0) == -179.0
    assert normalize_alpha(-180.0) == 180.0
    assert normalize_alpha(360.0) == 0.0
    assert normalize_alpha(180.0) == 180.0
    assert normalize_alpha(-90.0) == -90.0


def test_djt_params():
    d = DjtParams(upsilon=12.0, alpha=0.0)
    assert d.upsilon_x == 12.0 and d.upsilon_y == 0.0
    d = DjtParams(upsilon=12.0, alpha=90.0)
    assert d.upsilon_x == pytest.approx(0.0, abs=1e-12)
    assert d.upsilon_y == pytest.approx(12.0)
    d = DjtParams(upsilon=12.0, alpha=180.0)
    assert d.upsilon_x == pytest.approx(-12.0)
    with pytest.raises(ValueError):
        DjtParams(upsilon=-1.0, alpha=0.0)


def test_strain_modes():
    s = StrainNV(e_xx=3e-5, e_yy=1e-5, e_zz=2e-5, e_xy=4e-5, e_xz=5e-5, e_yz=6e-5)
    assert s.e_A1 == 2e-5
    assert s.e_A1_prime == pytest.approx(4e-5)
    assert s.e_Ex == pytest.approx(2e-5)
    assert s.e_Ey == pytest.approx(8e-5)
    assert s.e_Ex_prime == pytest.approx(1e-4)
    assert s.e_Ey_prime == pytest.approx(1.2e-4)


def test_strain_tensor_round_trip():
    s = StrainNV(e_xx=1e-5, e_yy=-2e-5, e_zz=3e-5, e_xy=4e-6, e_xz=-5e-6, e_yz=6e-6)
    t = s.tensor()
    assert np.allclose(t, t.T)
    assert StrainNV.from_tensor(t) == s
    bad = t.copy()
    bad[0, 1] += 1e-3
    with pytest.raises(ValueError):
        StrainNV.from_tensor(bad)


def test_orientation_frames_are_orthonormal():
    for o in ORIENTATIONS:
        r = o.rotation
        assert np.allclose(r @ r.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-12)
        # z row matches the crystallographic label
        axis = axis_from_label(o.label)
        assert np.allclose(o.z_axis, axis / np.linalg.norm(axis), atol=1e-12)


def test_orientation_z_axes_are_tetrahedral():
    zs = [o.z_axis for o in ORIENTATIONS]
    for i in range(4):
        for j in range(i + 1, 4):
            assert np.dot(zs[i], zs[j]) == pytest.approx(-1.0 / 3.0)


def test_alpha_sign_pattern():
    signs = [orientation_by_label(l).alpha_sign
             for l in ("[111]", "[-1-11]", "[-11-1]", "[1-1-1]")]
    assert signs == [1, -1, -1, 1]


def test_unknown_orientation_label():
    with pytest.raises(KeyError):
        orientation_by_label("[011]")


def test_rotation_round_trip():
    rng = np.random.default_rng(5)
    for o in ORIENTATIONS:
        v = rng.normal(size=3)
        back = rotate_nv_to_lab(rotate_lab_to_nv(v, o), o)
        assert np.allclose(back, v, atol=1e-12)


def test_cube_axis_field_decomposes_equally():
    # a [100] lab field has the same transverse magnitude F*sqrt(2/3) and
    # zero-or-equal axial part on all four orientations
    f = 3.0
    for o in ORIENTATIONS:
        fnv = lab_field_to_nv((f, 0.0, 0.0), o)
        trans = math.hypot(fnv.fx, fnv.fy)
        assert trans == pytest.approx(f * math.sqrt(2.0 / 3.0))
        assert abs(fnv.fz) == pytest.approx(f / math.sqrt(3.0))


def test_cube_axis_field_azimuths_are_uniform():
    # the in-plane field direction sits at the same azimuth for every
    # orientation once the frames are fixed; 120 degrees from the x axis
    for o in ORIENTATIONS:
        fnv = lab_field_to_nv((1.0, 0.0, 0.0), o)
        az = math.degrees(math.atan2(fnv.fy, fnv.fx))
        assert az == pytest.approx(120.0, abs=1e-9)


def test_lab_strain_rotation_preserves_trace():
    rng = np.random.default_rng(7)
    m = rng.normal(size=(3, 3)) * 1e-4
    e_lab = 0.5 * (m + m.T)
    for o in ORIENTATIONS:
        s = lab_strain_to_nv(e_lab, o)
        assert np.trace(s.tensor()) == pytest.approx(np.trace(e_lab))
        expected = o.rotation @ e_lab @ o.rotation.T
        assert np.allclose(s.tensor(), expected, atol=1e-15)


def test_oriented_djt_flips_alpha():
    d = DjtParams(upsilon=12.0, alpha=90.0)
    assert oriented_djt(d, orientation_by_label("[111]")).alpha == 90.0
    assert oriented_djt(d, orientation_by_label("[-1-11]")).alpha == -90.0
    d180 = DjtParams(upsilon=12.0, alpha=180.0)
    # -180 normalizes back into the (-180, 180] window
    assert oriented_djt(d180, orientation_by_label("[-11-1]")).alpha == 180.0


def test_orientation_validation():
    with pytest.raises(ValueError):
        NvOrientation(label="[111]", rotation=np.eye(3), alpha_sign=1)
