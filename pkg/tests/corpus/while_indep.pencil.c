void halve(int n, double v[restrict const static n], double threshold)
{
  double d;
  d = v[0];
#pragma pencil independent
  while (d > threshold) {
    d = d / 2;
  }
  v[0] = d;
}
