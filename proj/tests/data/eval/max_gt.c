/*@ ensures \result >= a;
    ensures \result >= b;
    ensures \result == a || \result == b; */
int imax(int a, int b)
{
  if (a > b)
    return a;
  return b;
}
