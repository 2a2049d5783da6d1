//------------------------------------------------------------------------------
// <auto-generated>
//     This code was generated by a tool.
// </auto-generated>
//------------------------------------------------------------------------------
using System;
using System.Web.Services.Protocols;

namespace Shop.Services.Shipping
{
    public partial class ShippingServiceClient : SoapHttpClientProtocol
    {
        public ShippingServiceClient()
        {
            this.Url = "http://shipping.example/soap";
        }

        public decimal GetRate(int weight, string zone)
        {
            object[] results = this.Invoke("GetRate", new object[] { weight, zone });
            return (decimal)results[0];
        }
    }
}
