//! Great-circle geometry on a spherical Earth.

use crate::scalar::Scalar;

use super::TrajectoryPoint;

/// Mean Earth radius in nautical miles.
pub const EARTH_RADIUS_NM: f64 = 3440.065;

/// Nautical miles spanned by one degree of latitude on the sphere.
pub fn nm_per_degree() -> f64 {
    EARTH_RADIUS_NM.to_radians()
}

/// Haversine distance between two lat/lon positions given in degrees.
pub fn haversine_nm<T: Scalar>(lat1: T, lon1: T, lat2: T, lon2: T) -> T {
    let half = T::lit(0.5);
    let phi1 = lat1.to_radians();
    let phi2 = lat2.to_radians();
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();
    let a = (dphi * half).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda * half).sin().powi(2);
    let a = a.max(T::zero()).min(T::one());
    let c = T::lit(2.0) * a.sqrt().atan2((T::one() - a).sqrt());
    c * T::lit(EARTH_RADIUS_NM)
}

/// Horizontal great-circle distance between two trajectory points.
pub fn great_circle_nm(p: &TrajectoryPoint, q: &TrajectoryPoint) -> f64 {
    haversine_nm(p.latitude, p.longitude, q.latitude, q.longitude)
}

fn to_unit_vector(lat: f64, lon: f64) -> [f64; 3] {
    let (phi, lambda) = (lat.to_radians(), lon.to_radians());
    [phi.cos() * lambda.cos(), phi.cos() * lambda.sin(), phi.sin()]
}

/// Position at `fraction` of the way along the great circle from `from` to `to`.
///
/// Returns `(latitude, longitude)` in degrees with longitude wrapped to [-180, 180).
pub fn interpolate(from: (f64, f64), to: (f64, f64), fraction: f64) -> (f64, f64) {
    let a = to_unit_vector(from.0, from.1);
    let b = to_unit_vector(to.0, to.1);
    let dot = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0);
    let omega = dot.acos();
    if omega.abs() < 1e-12 {
        return from;
    }
    let sin_omega = omega.sin();
    let wa = ((1.0 - fraction) * omega).sin() / sin_omega;
    let wb = (fraction * omega).sin() / sin_omega;
    let v = [
        wa * a[0] + wb * b[0],
        wa * a[1] + wb * b[1],
        wa * a[2] + wb * b[2],
    ];
    let lat = v[2].atan2((v[0] * v[0] + v[1] * v[1]).sqrt()).to_degrees();
    (lat, wrap_longitude(v[1].atan2(v[0]).to_degrees()))
}

/// Wraps a longitude into [-180, 180).
pub fn wrap_longitude(lon: f64) -> f64 {
    let wrapped = (lon + 180.0).rem_euclid(360.0) - 180.0;
    if wrapped >= 180.0 {
        wrapped - 360.0
    } else {
        wrapped
    }
}
