void countdown(int n, int out[restrict const static 1])
{
  out[0] = 0;
again:
  if (n > 0) {
    out[0] += n;
    n = n - 1;
    goto again;
  }
}
